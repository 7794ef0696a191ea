fn main() {
    std::process::exit(clem_gateway::cli::main_with(std::env::args()));
}
