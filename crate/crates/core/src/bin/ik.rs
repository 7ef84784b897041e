fn main() {
    std::process::exit(isokernel::cli::run(std::env::args_os()));
}
