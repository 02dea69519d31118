from stretchchaos.__main__ import cli_entry

if __name__ == "__main__":
    cli_entry()
