auto fleet = b2g::building::synthesize_fleet(network, spec.fleet_options);
