fn main() {
    std::process::exit(slipmix::cli::main_with_args(std::env::args_os()));
}
