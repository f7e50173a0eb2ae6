fn main() {
    std::process::exit(ratio_net::cli::main_with_args(std::env::args_os()));
}
