b2g::cosim::CosimEnvironment environment(network, fleet, sim_config);
