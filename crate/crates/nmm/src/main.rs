fn main() {
    std::process::exit(nmm::run(std::env::args_os()));
}
