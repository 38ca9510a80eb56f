fn main() {
    let code = matident::cli::run(std::env::args());
    std::process::exit(code);
}
