fn main() {
    std::process::exit(skyrlab::cli::run(std::env::args_os()));
}
