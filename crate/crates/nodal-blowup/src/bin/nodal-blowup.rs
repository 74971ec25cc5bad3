fn main() {
    std::process::exit(nodal_blowup::cli::main_with(std::env::args_os()));
}
