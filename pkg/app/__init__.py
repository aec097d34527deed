# Marks directory as a package


