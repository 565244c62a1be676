fn main() { polymer::io_cli::noop(); }
