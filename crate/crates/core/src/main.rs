fn main() {
    std::process::exit(tensileg::cli::run(std::env::args_os()));
}
