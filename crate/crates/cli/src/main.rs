fn main() {
    std::process::exit(gcqw_cli::main_with(std::env::args_os()));
}
