fn main() {
    std::process::exit(dvclust::cli::main());
}
