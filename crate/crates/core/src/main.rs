fn main() {
    std::process::exit(hartley_bessel::cli::run(std::env::args_os()));
}
