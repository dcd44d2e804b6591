auto screening_report = b2g::grid::screen(snapshot_flow, network, sim_config.limits);
