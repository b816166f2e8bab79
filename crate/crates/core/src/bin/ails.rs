fn main() {
    std::process::exit(ails_cvrp::cli::main_with_args(std::env::args_os()));
}
