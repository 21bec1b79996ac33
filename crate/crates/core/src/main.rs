fn main() { std::process::exit(cascade_mnl::cli::main()); }
