std::cout << b2g::cli::kpi_table(episode_trace.kpis);
