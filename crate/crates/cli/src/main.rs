fn main() {
    std::process::exit(spindle_cli::dispatch(std::env::args_os()));
}
