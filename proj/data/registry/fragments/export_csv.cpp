auto csv_files = b2g::cli::write_trace_csv(episode_trace, out_dir);
