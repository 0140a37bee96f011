fn main() {
    std::process::exit(arithgraph::cli::main_with_env());
}
