fn main() {
    std::process::exit(flmm::cli::main_exit_code());
}
