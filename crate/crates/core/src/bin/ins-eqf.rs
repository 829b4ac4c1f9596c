fn main() {
    std::process::exit(ins_eqf::cli::main_with(std::env::args_os()));
}
