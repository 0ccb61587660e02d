from qcollapse.cli import main

main()
