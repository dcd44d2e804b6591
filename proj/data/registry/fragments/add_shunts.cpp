auto network = base_network;
for (const auto& s : spec.shunts) network.shunts.push_back(s);
network.validate();
