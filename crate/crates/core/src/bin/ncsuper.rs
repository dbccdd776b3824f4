fn main() {
    std::process::exit(ncsuper::cli::run());
}
