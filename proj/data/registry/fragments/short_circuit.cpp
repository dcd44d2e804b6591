auto fault_report = b2g::grid::short_circuit_current(network, bus);
