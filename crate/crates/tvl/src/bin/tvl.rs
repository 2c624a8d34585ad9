fn main() {
    std::process::exit(tvl::cli::run(std::env::args_os()));
}
