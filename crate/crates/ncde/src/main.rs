fn main() {
    std::process::exit(ncde::run(std::env::args_os()));
}
