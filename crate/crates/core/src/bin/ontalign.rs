fn main() {
    std::process::exit(ontalign::pipeline::main_with_args(std::env::args_os()));
}
