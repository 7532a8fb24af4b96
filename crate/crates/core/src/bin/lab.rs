fn main() {
    std::process::exit(spinglass_lab::cli::dispatch(std::env::args_os()));
}
