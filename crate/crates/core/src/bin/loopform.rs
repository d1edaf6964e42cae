fn main() {
    std::process::exit(loopform::cli::run());
}
