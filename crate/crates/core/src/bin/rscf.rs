fn main() {
    std::process::exit(rscf::cli::run(std::env::args_os()));
}
