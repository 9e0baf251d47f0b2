fn main() {
    std::process::exit(hubnet::cli::run(std::env::args_os()));
}
