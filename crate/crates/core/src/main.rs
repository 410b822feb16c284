fn main() {
    std::process::exit(lapsmooth::cli::dispatch(std::env::args_os()));
}
