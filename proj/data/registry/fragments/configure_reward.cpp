b2g::cosim::SimulationConfig sim_config = spec.simulation;
