fn main() {
    std::process::exit(eot_cli::dispatch(std::env::args_os()));
}
