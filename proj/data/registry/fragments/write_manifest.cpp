auto run_manifest = b2g::cli::write_manifest(csv_files, out_dir);
