fn main() {
    std::process::exit(conflap::run(std::env::args_os()));
}
