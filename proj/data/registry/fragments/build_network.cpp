auto base_network = spec.network_path.empty() ? b2g::power::build_ieee33()
                                               : b2g::power::load_network(spec.network_path);
