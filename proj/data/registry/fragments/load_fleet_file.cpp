auto fleet = b2g::building::load_fleet(spec.fleet_path);
