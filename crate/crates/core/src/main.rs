fn main() {
    std::process::exit(thermal_arrow::cli::main_with_args(std::env::args_os()));
}
