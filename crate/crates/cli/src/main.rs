fn main() {
    std::process::exit(lar_sim::cli_main(std::env::args_os()));
}
