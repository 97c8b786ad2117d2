fn main() {
    std::process::exit(scan_spectra::cli::run(std::env::args_os()));
}
