auto contingency_report = b2g::grid::n_minus_1(network, snapshot_loads, sim_config.limits);
