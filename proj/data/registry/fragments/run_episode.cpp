auto episode_trace = b2g::cosim::run_episode(environment, policy);
