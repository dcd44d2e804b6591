auto figures = b2g::cli::emit_plots(episode_trace, out_dir);
