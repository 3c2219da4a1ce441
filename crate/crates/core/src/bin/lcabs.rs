fn main() {
    std::process::exit(lcabs::cli::main());
}
