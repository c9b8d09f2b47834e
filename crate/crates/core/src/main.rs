fn main() {
    std::process::exit(doubled_spectral::cli::main_entry(std::env::args_os()));
}
