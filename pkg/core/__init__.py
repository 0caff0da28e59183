"""Program representation, parser, checker and the context-insensitive solvers."""
