fn main() {
    // populated once the pipeline modules land
}
