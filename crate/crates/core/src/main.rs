fn main() {
    std::process::exit(memkick::cli::run(std::env::args_os()));
}
