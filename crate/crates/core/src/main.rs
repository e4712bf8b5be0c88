fn main() {
    std::process::exit(gonosomal::cli::run(std::env::args_os()));
}
