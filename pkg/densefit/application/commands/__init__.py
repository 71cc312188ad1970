# argparse sub-commands
