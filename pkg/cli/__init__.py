"""Command-line front end: one check class per subcommand."""
