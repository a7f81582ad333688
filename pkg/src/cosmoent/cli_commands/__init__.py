"""CLI subcommands for cosmoent."""
