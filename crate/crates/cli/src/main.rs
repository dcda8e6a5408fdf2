fn main() {
    std::process::exit(qmorph::main_with_args(std::env::args_os()));
}
