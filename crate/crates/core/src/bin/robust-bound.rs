fn main() {
    std::process::exit(robust_bound::cli::main_with_args(
        std::env::args_os().collect(),
    ));
}
